#include "conegl/cli.hpp"

int main(int argc, char** argv) { return conegl::cli_main(argc, argv); }
