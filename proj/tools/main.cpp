#include "detnet/cli.hpp"

int main(int argc, char** argv) { return detnet::cli::run(argc, argv); }
