#include "csdplan/cli.hpp"

int main(int argc, char** argv) { return csdplan::cli::run(argc, argv); }
