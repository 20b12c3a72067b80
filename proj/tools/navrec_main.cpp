#include "navrec/cli.hpp"

int main(int argc, char** argv) { return navrec::run_cli(argc, argv); }
