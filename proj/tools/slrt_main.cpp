#include "slrt/cli.hpp"

int main(int argc, char** argv) { return slrt::cli_main(argc, argv); }
