#include <iostream>

#include "hetcache/experiment.hpp"

int main(int argc, char** argv) { return hetcache::run_cli(argc, argv, std::cout, std::cerr); }
