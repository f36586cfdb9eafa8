#include "clda/cli.hpp"

int main(int argc, char** argv) { return clda::run_cli(argc, argv); }
