#include "berkmc/problem.hpp"

int main(int argc, char** argv) { return berkmc::cli_main(argc, argv); }
