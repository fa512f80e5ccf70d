#ifndef TPOLY_TPOLY_HPP
#define TPOLY_TPOLY_HPP

#include "tpoly/error.hpp"
#include "tpoly/core.hpp"
#include "tpoly/walk.hpp"
#include "tpoly/oracle.hpp"
#include "tpoly/reduction.hpp"
#include "tpoly/instances.hpp"
#include "tpoly/trace.hpp"

#endif
