#include "geiringer/cli.hpp"

int main(int argc, char** argv) { return geiringer::cli::main(argc, argv); }
