#include "rotdet/cli.hpp"

int main(int argc, char** argv) { return rotdet::cli_main(argc, argv); }
