#include "tav/tavhmm.hpp"
int main() { return 0; }
