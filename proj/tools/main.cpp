#include "cli.hpp"

int main(int argc, char** argv) { return ccmsel::cli::run(argc, argv); }
