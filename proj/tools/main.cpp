#include "attn/cli.hpp"

int main(int argc, char** argv) { return attn::cli_main(argc, argv); }
