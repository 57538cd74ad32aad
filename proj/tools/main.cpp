#include "tools/cli.hpp"

int main(int argc, char** argv) { return ridebench::cli::dispatch(argc, argv); }
