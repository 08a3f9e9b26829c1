#include "tpls/cli.hpp"

int main(int argc, char** argv) { return tpls::cli_main(argc, argv); }
