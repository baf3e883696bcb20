#include "avgh/cli.hpp"

int main(int argc, char** argv) { return avgh::cli_main(argc, argv); }
