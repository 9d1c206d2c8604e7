#include <doctest.h>

TEST_SUITE("sampling") {}
