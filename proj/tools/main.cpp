#include "cli.hpp"

int main(int argc, char** argv) { return hpdesign::cli::run(argc, argv); }
