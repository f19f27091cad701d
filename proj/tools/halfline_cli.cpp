#include "halfline/halfline.h"
#include <stdio.h>
int main(){ printf("%s\n", hl_version()); return 0; }
