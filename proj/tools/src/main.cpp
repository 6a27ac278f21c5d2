#include "cli.hpp"

int main(int argc, char** argv) { return skelgait::cli::run(argc, argv); }
