#include "ghindex/cli.hpp"

int main(int argc, char** argv) { return ghindex::run_cli(argc, argv); }
