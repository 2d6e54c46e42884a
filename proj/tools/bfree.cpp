#include "bfree/cliapp.hpp"

int main(int argc, char** argv) { return bfree::run_cli(argc, argv); }
