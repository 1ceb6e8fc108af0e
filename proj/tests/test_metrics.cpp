#include <catch2/catch_amalgamated.hpp>

#include "lnsforge/lnsforge.hpp"
