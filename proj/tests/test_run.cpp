#include <doctest.h>

#include "emss/run.hpp"
