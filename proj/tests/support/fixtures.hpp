#ifndef TPOLY_TESTS_FIXTURES_HPP
#define TPOLY_TESTS_FIXTURES_HPP

#include <vector>

#include "tpoly/tpoly.hpp"

namespace tpoly::testing {

// u = (5,3), v = (4,2,2): edge (1,1) is critical.
inline TransportationInstance example_critical() { return {{5, 3}, {4, 2, 2}, {}}; }

// u = (3,3), v = (2,2,2): the walk example.
inline TransportationInstance example_walk() { return {{3, 3}, {2, 2, 2}, {}}; }

inline std::vector<Edge> walk_origin() { return {{1, 1}, {1, 2}, {2, 2}, {2, 3}}; }
inline std::vector<Edge> walk_final() { return {{1, 2}, {1, 3}, {2, 1}, {2, 2}}; }

inline std::vector<Edge> critical_left() { return {{1, 1}, {1, 2}, {2, 2}, {2, 3}}; }
inline std::vector<Edge> critical_right() { return {{1, 1}, {1, 2}, {2, 1}, {2, 3}}; }

// Nodes a,b,c,d with excesses 20,0,0,-20 and arcs ab:10 ac:20 bc:5 bd:30 cb:15 cd:10.
inline Network sample_network() {
  Network net;
  net.names = {"a", "b", "c", "d"};
  net.excess = {20, 0, 0, -20};
  net.arcs = {{1, 2, 10}, {1, 3, 20}, {2, 3, 5}, {2, 4, 30}, {3, 2, 15}, {3, 4, 10}};
  return net;
}

inline Network single_arc_network() {
  Network net;
  net.excess = {1, -1};
  net.arcs = {{1, 2, 2}};
  return net;
}

}  // namespace tpoly::testing

#endif
