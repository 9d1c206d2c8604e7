#include <doctest.h>

TEST_SUITE("diagnostics") {}
