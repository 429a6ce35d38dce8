#include "telegraph_kit/cli.hpp"

int main(int argc, char** argv) { return telegraph_kit::cli::main(argc, argv); }
