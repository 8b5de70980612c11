#include "cli.hpp"

int main(int argc, char** argv) { return ellab::cli::run(argc, argv); }
