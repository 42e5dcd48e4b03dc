#include "terraindiff/cli.hpp"

int main(int argc, char** argv) { return terraindiff::run_cli(argc, argv); }
