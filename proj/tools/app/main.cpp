#include "commands.hpp"

int main(int argc, char** argv) { return rcrl::cli::RunCli(argc, argv); }
