#include "gwlife/cli.hpp"

int main(int argc, char** argv) { return gwlife::cli::main(argc, argv); }
