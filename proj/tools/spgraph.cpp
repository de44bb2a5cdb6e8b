#include "spgraph/harness.hpp"

int main(int argc, char **argv) { return spgraph::run_cli(argc, argv); }
