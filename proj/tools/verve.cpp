#include "verve/interface/cli.hpp"

int main(int argc, char** argv) { return verve::interface::cli_main(argc, argv); }
