#include <doctest.h>

TEST_SUITE("replay_buffer") {}
