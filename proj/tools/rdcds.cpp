#include "rdcds/cli.hpp"

int main(int argc, char** argv) { return rdcds::cli_main(argc, argv); }
