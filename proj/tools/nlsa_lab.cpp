#include "nlsa/cli.hpp"

int main(int argc, char** argv) { return nlsa::cli::run(argc, argv); }
