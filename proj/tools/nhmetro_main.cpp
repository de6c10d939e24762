#include "nhmetro/cli.hpp"

int main(int argc, char** argv) { return nhmetro::cli::main_entry(argc, argv); }
