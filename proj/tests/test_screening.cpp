#include <doctest.h>

#include "emss/screening.hpp"
