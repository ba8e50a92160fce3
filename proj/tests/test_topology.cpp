#include <doctest.h>

#include "emss/topology.hpp"
