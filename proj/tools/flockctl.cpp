#include "flock/cli.hpp"

int main(int argc, char** argv) { return flock::cli::main(argc, argv); }
