#include <doctest.h>

TEST_SUITE("verification") {}
