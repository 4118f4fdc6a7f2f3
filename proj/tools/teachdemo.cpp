#include "teachdemo/cli.hpp"

int main(int argc, char** argv) { return teachdemo::run_cli(argc, argv); }
