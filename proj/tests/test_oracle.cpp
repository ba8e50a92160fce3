#include <doctest.h>

#include "emss/oracle.hpp"
