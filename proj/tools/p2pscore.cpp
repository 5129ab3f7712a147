#include "p2pscore/cli.hpp"

int main(int argc, char** argv) { return p2p::run_cli(argc, argv); }
