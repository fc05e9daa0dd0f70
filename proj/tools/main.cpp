#include "plbm/cli.hpp"

int main(int argc, char** argv) { return plbm::iobench::run_cli(argc, argv); }
