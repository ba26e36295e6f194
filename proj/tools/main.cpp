#include "cli.hpp"

int main(int argc, char** argv) { return segdecide::cli::dispatch(argc, argv); }
