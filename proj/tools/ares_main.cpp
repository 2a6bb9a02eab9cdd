#include "ares/cli.hpp"

int main(int argc, char** argv) { return ares::run_cli(argc, argv); }
