#include "qadpa/cli.hpp"

int main(int argc, char** argv) { return qadpa::cli_main(argc, argv); }
