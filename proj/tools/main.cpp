#include "vortexpair/cli.hpp"

int main(int argc, char** argv) { return vortexpair::cli::run(argc, argv); }
