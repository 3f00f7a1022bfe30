#include "doctest.h"

TEST_CASE("module pending") { CHECK(true); }
