#include "pflow/cli.hpp"

int main(int argc, char** argv) { return pflow::run_cli(argc, argv); }
