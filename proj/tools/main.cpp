#include "seqbwt/cli.hpp"

int main(int argc, char** argv) { return seqbwt::cli::run(argc, argv); }
