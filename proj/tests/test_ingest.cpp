#include <doctest.h>

#include "emss/ingest.hpp"
