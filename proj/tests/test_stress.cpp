#include <doctest.h>

#include "emss/stress.hpp"
