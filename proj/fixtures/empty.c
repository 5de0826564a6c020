/* nothing to optimize */
