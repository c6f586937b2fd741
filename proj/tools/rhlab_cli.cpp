#include "cli_app.hpp"

int main(int argc, char** argv) { return rhlab::cli::run(argc, argv); }
