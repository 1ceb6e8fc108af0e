#include "lnsforge/lnsforge.hpp"

int main() { return 0; }
