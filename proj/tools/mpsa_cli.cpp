#include "mpsa/cli.hpp"

int main(int argc, char** argv) { return mpsa::cli::run(argc, argv); }
