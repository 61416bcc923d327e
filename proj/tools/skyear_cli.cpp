#include "skyear/commands.hpp"

int main(int argc, char** argv) { return skyear::run_cli(argc, argv); }
